"""Algebra module"""
