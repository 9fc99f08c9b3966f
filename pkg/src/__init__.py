"""jamsense - self-adaptive jamming detection loop for uplink RAN KPIs"""
__version__ = "0.1.0"
