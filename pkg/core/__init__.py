# stackwise - Core Module
__version__ = "1.0.0"
