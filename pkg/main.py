import contextlib
import sys

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from src.api import asymptotics, enumeration, mobiles, twopoint, utils
from src.conf.config import configure_logging


@contextlib.asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging()
    yield


app = FastAPI(title="carto", lifespan=lifespan)


origins = ["http://localhost:3000", "http://localhost:8000"]
app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


app.include_router(utils.router, prefix="/api")
app.include_router(twopoint.router, prefix="/api")
app.include_router(asymptotics.router, prefix="/api")
app.include_router(enumeration.router, prefix="/api")
app.include_router(mobiles.router, prefix="/api")


if __name__ == "__main__":
    from src.cli import run

    sys.exit(run())
