from .db_manager import get_db, ResultsDB
