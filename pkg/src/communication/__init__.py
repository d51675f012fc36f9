# Artifact File Protocol
