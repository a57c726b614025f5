import logging
import os
import traceback
from dotenv import load_dotenv

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from src.errors import SvaForgeError
from src.router.booklog import router as booklog_router
from src.router.lint import router as lint_router

# Load environment variables
load_dotenv()

# Configure logging
logger = logging.getLogger(__name__)

app = FastAPI(
    title="sva-forge API",
    description="Read-only access to the iteration booklog and cost ledger, plus a stateless SVA lint endpoint",
    version="0.1.0"
)

# Configure CORS
cors_origins = os.getenv("CORS_ORIGINS", "http://localhost:3000,http://127.0.0.1:3000")
allow_origins_list = [origin.strip() for origin in cors_origins.split(",")]

app.add_middleware(
    CORSMiddleware,
    allow_origins=allow_origins_list,
    allow_credentials=False,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
    max_age=600,
)


@app.middleware("http")
async def log_requests(request: Request, call_next):
    logger.debug(f"Incoming request: {request.method} {request.url}")
    response = await call_next(request)
    logger.debug(f"Response status: {response.status_code}")
    return response


@app.exception_handler(SvaForgeError)
async def forge_exception_handler(request: Request, exc: SvaForgeError):
    logger.error(f"{type(exc).__name__} on {request.method} {request.url}: {str(exc)}")
    return JSONResponse(
        status_code=422 if isinstance(exc, ValueError) else 500,
        content={"detail": str(exc), "error_type": type(exc).__name__}
    )


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """Global exception handler to catch all unhandled exceptions"""
    logger.error(f"Unhandled exception: {str(exc)}")
    logger.error(f"Error type: {type(exc).__name__}")
    logger.error(f"Request URL: {request.url}")
    logger.error(f"Full traceback: {traceback.format_exc()}")

    return JSONResponse(
        status_code=500,
        content={
            "detail": "Internal server error",
            "error_type": type(exc).__name__,
            "error_message": str(exc)
        }
    )


logger.debug("Including booklog router")
app.include_router(booklog_router)

logger.debug("Including lint router")
app.include_router(lint_router)


@app.get("/")
def read_root():
    return {"service": "sva-forge", "endpoints": ["/v1/booklog", "/v1/booklog/table", "/v1/cost", "/v1/lint"]}
