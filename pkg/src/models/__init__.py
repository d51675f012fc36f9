# Circuit and Hamiltonian Models Package
