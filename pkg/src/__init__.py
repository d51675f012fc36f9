# Gadget Reinforcement Learning for TFIM Ground States - Main Package
