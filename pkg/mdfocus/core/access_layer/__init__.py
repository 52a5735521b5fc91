# Local
from .file import AtomicFile, TraceWriter, flatten_record, read_rows, write_csv
