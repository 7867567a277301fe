"""HTTP service wrapping the core package: pydantic models and FastAPI app."""
