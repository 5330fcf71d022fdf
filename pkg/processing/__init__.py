"""Processing module"""
