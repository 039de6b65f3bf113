"""Adjusted risk measures on finite laws and rolling return windows."""
