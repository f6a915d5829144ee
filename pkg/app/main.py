from fastapi import FastAPI

from .api import backend, episodes, health, prompt, specs

app = FastAPI(title="MASMP Arena")

app.include_router(health.router, prefix="/health", tags=["health"])
app.include_router(specs.router, prefix="/spec", tags=["spec"])
app.include_router(backend.router, prefix="/backend", tags=["backend"])
app.include_router(episodes.router, prefix="/episodes", tags=["episodes"])
app.include_router(prompt.router, prefix="/prompt", tags=["prompt"])
