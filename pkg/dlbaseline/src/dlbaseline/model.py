"""Convolutional-recurrent network over log-power spectrograms.

Two convolution blocks (16 and 32 channels, 3x3 kernels, 2x2 max pooling)
condense the grid, a two-layer GRU with hidden size 128 reads the result as
a time sequence, and a linear head scores the classes from the last real
step. Hyperparameters are fixed; this model is a comparison point, not a
search space.
"""

import torch
from torch import nn

from .tensors import N_BINS, N_FRAMES

# Two rounds of 2x2 pooling.
POOL_FACTOR = 4
_SEQ_FEATURES = 32 * (N_BINS // POOL_FACTOR)


class ConvGru(nn.Module):
    def __init__(self, n_classes: int):
        super().__init__()
        if n_classes < 2:
            raise ValueError("need at least two classes")
        self.conv = nn.Sequential(
            nn.Conv2d(1, 16, kernel_size=3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(16, 32, kernel_size=3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
        )
        self.gru = nn.GRU(_SEQ_FEATURES, 128, num_layers=2, batch_first=True)
        self.head = nn.Linear(128, n_classes)

    def forward(self, grids: torch.Tensor, n_real_frames: torch.Tensor) -> torch.Tensor:
        """Class logits from (batch, N_FRAMES, N_BINS) grids.

        n_real_frames gives the unpadded frame count per sample; the head
        reads the GRU state at the last pooled step that still holds real
        frames.
        """
        if grids.shape[1:] != (N_FRAMES, N_BINS):
            raise ValueError(f"expected (batch, {N_FRAMES}, {N_BINS}) input")
        feat = self.conv(grids.unsqueeze(1))
        seq = feat.permute(0, 2, 1, 3).reshape(feat.shape[0], feat.shape[2], -1)
        out, _ = self.gru(seq)
        steps = torch.div(n_real_frames + POOL_FACTOR - 1, POOL_FACTOR, rounding_mode="floor")
        steps = steps.clamp(1, out.shape[1])
        last = out[torch.arange(out.shape[0]), steps - 1]
        return self.head(last)
