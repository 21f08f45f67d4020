"""Package docstring mentioning openai/whisper-small."""
