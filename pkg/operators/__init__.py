"""Operators module"""
