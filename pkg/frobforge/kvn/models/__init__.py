"""Wave field and Hamiltonian models."""
