# HTTP routers: booklog/cost read surface and the stateless lint endpoint
