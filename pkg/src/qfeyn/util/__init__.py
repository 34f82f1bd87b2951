"""
Small utilities shared by the command line and the test suite:
log formatting, report serializers and a timer.
"""
