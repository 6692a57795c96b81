from .components import COMPONENT_NAMES, horizontal_component, magnetic_norm, signal_components, vertical_component
from .framing import ExtendedFrame, FrameStream, frame_count, frame_stream
from .io import dump_frames, load_frames
from .labeling import frame_labels, label_frames
from .sir import measure_sir, sir_frame_length

__all__ = [
    "COMPONENT_NAMES",
    "ExtendedFrame",
    "FrameStream",
    "dump_frames",
    "frame_count",
    "frame_labels",
    "frame_stream",
    "horizontal_component",
    "label_frames",
    "load_frames",
    "magnetic_norm",
    "measure_sir",
    "signal_components",
    "sir_frame_length",
    "vertical_component",
]
