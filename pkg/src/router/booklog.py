from fastapi import APIRouter, Depends, HTTPException, status
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel
from pathlib import Path
from typing import List
import logging
import os
import traceback

from ..errors import CorruptLog
from ..gateway import CostLedger, total_cost
from ..loop import Booklog, IterationRecord, export_table

# Configure logging
logger = logging.getLogger(__name__)

# Router
router = APIRouter(prefix="/v1", tags=["booklog"])

DEFAULT_BOOKLOG = "ft-out/booklog.jsonl"
DEFAULT_LEDGER = "ft-out/ledger.jsonl"


class CostInfo(BaseModel):
    calls: int
    usd: str


def get_booklog() -> Booklog:
    return Booklog(os.getenv("SVA_FORGE_BOOKLOG", DEFAULT_BOOKLOG))


def get_ledger() -> CostLedger:
    return CostLedger(Path(os.getenv("SVA_FORGE_LEDGER", DEFAULT_LEDGER)))


# -=-=-=-=-=- BOOKLOG -=-=-=-=-=- #

@router.get("/booklog", response_model=List[IterationRecord])
def read_booklog(booklog: Booklog = Depends(get_booklog)):
    try:
        logger.debug(f"Reading booklog {booklog.path}")
        return booklog.records()
    except CorruptLog as e:
        logger.error(f"Corrupt booklog: {str(e)}")
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(e))


@router.get("/booklog/table", response_class=PlainTextResponse)
def read_booklog_table(booklog: Booklog = Depends(get_booklog)):
    try:
        return export_table(booklog.records())
    except CorruptLog as e:
        logger.error(f"Corrupt booklog: {str(e)}")
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(e))


# -=-=-=-=-=- COST -=-=-=-=-=- #

@router.get("/cost", response_model=CostInfo)
def read_cost(ledger: CostLedger = Depends(get_ledger)):
    try:
        return CostInfo(calls=len(ledger), usd=str(total_cost(ledger)))
    except Exception as e:
        logger.error(f"Error reading cost ledger: {str(e)}")
        logger.error(f"Traceback: {traceback.format_exc()}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Failed to read the cost ledger"
        )
