"""Phoneme-aware tongue-twister generation and evaluation toolkit."""
