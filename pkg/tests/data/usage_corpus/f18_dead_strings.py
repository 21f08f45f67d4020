def main():
    "AutoModel.from_pretrained('org/model')"
    note = """
    pipeline(model="meta-llama/Llama-2-7b-hf")
    """
    return note


if __name__ == "__main__":
    main()
