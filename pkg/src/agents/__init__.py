# Agents Package
