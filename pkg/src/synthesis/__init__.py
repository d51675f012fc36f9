# Program Synthesis Package
