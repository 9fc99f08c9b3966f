"""API module for FastAPI endpoints"""



