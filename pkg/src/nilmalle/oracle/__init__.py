"""Independent counts for abelian groups via Dirichlet characters."""
