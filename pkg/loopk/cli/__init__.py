"""Command-line front end: request models, validation and dispatch"""
