"""Run configuration, report files and check bookkeeping for btstrata."""
