"""Maximal-LFSR Floquet circuits, their chi eigenstates, and periodic clock Hamiltonians."""

__version__ = "0.1.0"
