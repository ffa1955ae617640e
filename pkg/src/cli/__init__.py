from src.cli.document import AlgebraDocument, parse_algebra_file, parse_algebra_text, dump_algebra_document
from src.cli.report import AuditDocument, emit_report
from src.cli.commands import run_command
