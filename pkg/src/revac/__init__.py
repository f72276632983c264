"""Secret Mafia engine, Revac_8 social-reasoning agent and reasoning benchmark."""

__version__ = "0.1.0"
