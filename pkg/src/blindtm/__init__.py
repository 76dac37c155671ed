"""Blind multi-tape machines, problem builders and a weft-2 circuit compiler."""
