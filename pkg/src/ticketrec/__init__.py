"""Retrieval of similar IT support tickets.

Given a new ticket, find the most similar previously resolved ones using
any of several interchangeable representation techniques; benchmark the
techniques against analyst-labeled ground truth; serve the best one
behind a small HTTP API.
"""

__version__ = "0.1.0"
