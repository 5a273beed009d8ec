from dataclasses import dataclass, asdict, fields


@dataclass(frozen=True)
class PerceptionConfig:
    """Thresholds for the widget-recognition pipeline.

    Size factors are relative to the median text-fragment height (merging) or
    to the taller of the two boxes (fusion); fractions are relative to the
    screenshot.
    """

    text_gap_factor: float = 0.5
    text_align_factor: float = 0.5
    text_iou: float = 0.5
    text_contain_margin: int = 2
    statusbar_frac: float = 0.05
    max_area_frac: float = 0.5
    min_area_px: int = 100
    fuse_dist_factor: float = 1.5

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in (data or {}).items() if k in known})
