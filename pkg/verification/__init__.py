"""Verification module"""
