"""Dual-layer image coding: a block-DCT base layer refined by compressive
measurements of automatically detected critical pixels."""
from .base_codec import BaseLayerPayload, DctGrid, decode_base, encode_base, scale_quant_table
from .bench import RdPoint, psnr, run_rd
from .container import (AgdlBitstream, AgdlConfig, AgdlHeader, decode, decode_detailed, encode,
                        encode_detailed, parse, serialize)
from .critical_mask import CriticalSet, MaskParams, canny_edges, change_map, detect_critical, spectral_saliency
from .cs_refine import (CsMatrix, Measurements, apply_adjustment, build_matrix, dequantize, least_norm_adjust,
                        quantize, sample)
from .errors import AgdlError, IntegrityError, InvalidParameterError, MalformedPayloadError, RankFailureError
from .pgm import read_pgm, write_pgm
from .soft_decoder import PocsParams, project_dct_bins, smooth_pixels, soft_decode

__version__ = "0.1.0"
