#!/usr/bin/env python3
"""Regenerates data/models/*.txt from the standard published layer shapes.

Line format: name kind H W C Kh Kw Cout stride padding
Residual adds, batch norm, activations and squeeze-excite blocks carry no
MACs worth modelling at this level and are omitted.
"""
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "models"


class Net:
    def __init__(self, name, h, w, c):
        self.name, self.h, self.w, self.c = name, h, w, c
        self.lines = []

    def _emit(self, name, kind, kh, kw, cout, stride, pad, h=None, w=None, c=None):
        h = self.h if h is None else h
        w = self.w if w is None else w
        c = self.c if c is None else c
        self.lines.append(f"{name} {kind} {h} {w} {c} {kh} {kw} {cout} {stride} {pad}")
        return h, w, c

    def _out(self, k, stride, pad):
        if pad == "same":
            return math.ceil(self.h / stride), math.ceil(self.w / stride)
        return (self.h - k) // stride + 1, (self.w - k) // stride + 1

    def conv(self, name, k, cout, stride=1, pad="same"):
        self._emit(name, "conv", k, k, cout, stride, pad)
        self.h, self.w = self._out(k, stride, pad)
        self.c = cout

    def dw(self, name, k, stride=1):
        self._emit(name, "dwconv", k, k, self.c, stride, "same")
        self.h, self.w = self._out(k, stride, "same")

    def pool(self, name, k, stride, pad="valid"):
        self._emit(name, "pool", k, k, self.c, stride, pad)
        self.h, self.w = self._out(k, stride, pad)

    def global_pool(self, name):
        self.pool(name, self.h, 1)

    def fc(self, name, out):
        self._emit(name, "fc", 1, 1, out, 1, "valid")
        self.h, self.w, self.c = 1, 1, out

    def write(self, header):
        text = f"# {header}\n" + "\n".join(self.lines) + "\n"
        (OUT / f"{self.name}.txt").write_text(text)


def lenet5():
    n = Net("lenet5", 32, 32, 1)
    n.conv("conv1", 5, 6, pad="valid")
    n.pool("pool1", 2, 2)
    n.conv("conv2", 5, 16, pad="valid")
    n.pool("pool2", 2, 2)
    n.fc("fc1", 120)
    n.fc("fc2", 84)
    n.fc("fc3", 10)
    n.write("LeNet-5, 32x32x1 input")


def vgg16():
    n = Net("vgg16", 224, 224, 3)
    cfg = [(2, 64), (2, 128), (3, 256), (3, 512), (3, 512)]
    for b, (reps, ch) in enumerate(cfg, 1):
        for r in range(1, reps + 1):
            n.conv(f"conv{b}_{r}", 3, ch)
        n.pool(f"pool{b}", 2, 2)
    n.fc("fc6", 4096)
    n.fc("fc7", 4096)
    n.fc("fc8", 1000)
    n.write("VGG-16, 224x224x3 input")


def resnet18():
    n = Net("resnet18", 224, 224, 3)
    n.conv("conv1", 7, 64, 2)
    n.pool("pool1", 3, 2, "same")
    for stage, ch in enumerate([64, 128, 256, 512], 1):
        for blk in range(2):
            stride = 2 if stage > 1 and blk == 0 else 1
            h, w, c = n.h, n.w, n.c
            n.conv(f"res{stage}{blk}_a", 3, ch, stride)
            n.conv(f"res{stage}{blk}_b", 3, ch)
            if stride != 1 or c != ch:
                n._emit(f"res{stage}{blk}_down", "conv", 1, 1, ch, stride, "same", h, w, c)
    n.global_pool("avgpool")
    n.fc("fc", 1000)
    n.write("ResNet-18, 224x224x3 input")


def densenet121():
    n = Net("densenet121", 224, 224, 3)
    n.conv("conv0", 7, 64, 2)
    n.pool("pool0", 3, 2, "same")
    growth = 32
    for b, reps in enumerate([6, 12, 24, 16], 1):
        base = n.c
        for i in range(reps):
            cin = base + i * growth
            n.c = cin
            n.conv(f"db{b}_{i}_1x1", 1, 4 * growth)
            n.conv(f"db{b}_{i}_3x3", 3, growth)
        n.c = base + reps * growth
        if b < 4:
            n.conv(f"trans{b}", 1, n.c // 2)
            n.pool(f"trans{b}_pool", 2, 2)
    n.global_pool("avgpool")
    n.fc("fc", 1000)
    n.write("DenseNet-121 (growth 32, bottleneck 4x), 224x224x3 input")


def mobilenetv2():
    n = Net("mobilenetv2", 224, 224, 3)
    n.conv("conv0", 3, 32, 2)
    cfg = [(1, 16, 1, 1), (6, 24, 2, 2), (6, 32, 3, 2), (6, 64, 4, 2), (6, 96, 3, 1), (6, 160, 3, 2), (6, 320, 1, 1)]
    idx = 0
    for t, ch, reps, s in cfg:
        for r in range(reps):
            stride = s if r == 0 else 1
            if t != 1:
                n.conv(f"b{idx}_expand", 1, n.c * t)
            n.dw(f"b{idx}_dw", 3, stride)
            n.conv(f"b{idx}_project", 1, ch)
            idx += 1
    n.conv("conv_last", 1, 1280)
    n.global_pool("avgpool")
    n.fc("fc", 1000)
    n.write("MobileNetV2 (width 1.0), 224x224x3 input")


def efficientnetb0():
    n = Net("efficientnetb0", 224, 224, 3)
    n.conv("stem", 3, 32, 2)
    cfg = [(1, 3, 1, 16, 1), (6, 3, 2, 24, 2), (6, 5, 2, 40, 2), (6, 3, 2, 80, 3),
           (6, 5, 1, 112, 3), (6, 5, 2, 192, 4), (6, 3, 1, 320, 1)]
    idx = 0
    for t, k, s, ch, reps in cfg:
        for r in range(reps):
            stride = s if r == 0 else 1
            if t != 1:
                n.conv(f"mb{idx}_expand", 1, n.c * t)
            n.dw(f"mb{idx}_dw", k, stride)
            n.conv(f"mb{idx}_project", 1, ch)
            idx += 1
    n.conv("head", 1, 1280)
    n.global_pool("avgpool")
    n.fc("fc", 1000)
    n.write("EfficientNet-B0 without squeeze-excite, 224x224x3 input")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for fn in (lenet5, vgg16, resnet18, densenet121, mobilenetv2, efficientnetb0):
        fn()
