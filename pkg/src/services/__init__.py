"""Service layer for the simulation: bases, Hamiltonians, propagation and observables."""
