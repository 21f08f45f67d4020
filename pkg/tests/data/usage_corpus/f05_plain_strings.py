MODEL_ID = "org/model"
CANDIDATES = ["bigscience/bloom-560m", "google/flan-t5-base"]
print("using", "mistralai/Mistral-7B-v0.1")
message = f"downloading {MODEL_ID}"
