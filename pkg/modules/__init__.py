# stackwise - Modules
