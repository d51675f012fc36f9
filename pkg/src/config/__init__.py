# Parameter Authority and Run Configuration
