from .report_exporter import read_report, report_frame, report_to_dict, write_report, write_table

__all__ = ["read_report", "report_frame", "report_to_dict", "write_report", "write_table"]
