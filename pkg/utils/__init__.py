# stackwise - Utilities Module
