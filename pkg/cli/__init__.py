"""Command-line module"""
