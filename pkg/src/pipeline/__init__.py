# Pipeline Package
