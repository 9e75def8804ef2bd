# Modules package for the log-sum inequality verifier
