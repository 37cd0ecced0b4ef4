# Schemas package