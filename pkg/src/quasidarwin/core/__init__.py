"""Numerical core: linear algebra, the model Hamiltonian, KD distributions and sweeps."""
