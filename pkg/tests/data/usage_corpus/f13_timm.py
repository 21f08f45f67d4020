import timm

net = timm.create_model("hf-hub:timm/resnet50.a1_in1k", pretrained=True)  # USAGE: timm/resnet50.a1_in1k
