# Utility modules: logging, data loading and result handling
