# Laboratorio de interpolación compleja: espacios, solver de Calderón, derivaciones y diagnósticos

__version__ = "0.1.0"
