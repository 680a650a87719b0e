"""
REST API for the wave packet lab: exponent classification, example
profiles, decompositions and point values of Ef.
"""
from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field
from typing import Dict, Optional
from datetime import datetime
import logging
import sys
import os

import numpy as np
import scipy
import uvicorn

# Add the parent directory to Python path so the src packages import
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from exponent_ops.polytope import constraint_report, make_point, named_vertices, parse_exponent
from harmonic_core.extension import evaluate_extension
from harmonic_core.profiles import FrequencyProfile
from lab_harness.config import LabConfig, load_config
from wave_packets.decomposition import WavePacketDecomposer
from wave_packets.families import FAMILIES, build_family

API_VERSION = "1.0.0"

logger = logging.getLogger(__name__)

app = FastAPI(
    title="Wave Packet Lab API",
    description="Numerical laboratory for wave packets and refined Strichartz exponents",
    version=API_VERSION,
)

lab_config: LabConfig = load_config(os.environ.get("WPL_CONFIG"))


class ProfileRequest(BaseModel):
    """Family member at scale R"""
    family: str = "f0"
    R: float = Field(default=256.0, gt=0)
    N: Optional[int] = Field(default=None, ge=1)
    U: Optional[float] = Field(default=None, gt=0)
    M: Optional[int] = Field(default=None, ge=16)


class PointRequest(ProfileRequest):
    x: float = 0.0
    t: float = 0.0


def _build(request: ProfileRequest) -> FrequencyProfile:
    if request.family not in FAMILIES:
        raise HTTPException(status_code=400, detail=f"unknown family '{request.family}'")
    try:
        return build_family(request.family, request.R, N=request.N, U=request.U, M=request.M)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


def complex_to_serializable(value: complex) -> Dict[str, float]:
    return {"real": float(np.real(value)), "imag": float(np.imag(value)), "abs": float(abs(value))}


@app.get("/")
async def root():
    """API root endpoint"""
    return {
        "message": "Wave Packet Lab API",
        "version": API_VERSION,
        "status": "operational",
        "families": sorted(FAMILIES),
    }


@app.get("/system/status")
async def system_status():
    return {
        "timestamp": datetime.now().isoformat(),
        "versions": {"numpy": np.__version__, "scipy": scipy.__version__, "api": API_VERSION},
        "config": lab_config.summary(),
    }


@app.get("/polytope")
async def polytope(
    p: str = Query(..., description="Exponent p, fractions allowed"),
    alpha: str = Query(...),
    beta: str = Query(...),
):
    """Sufficient/necessary membership and tight constraints of (p, alpha, beta)"""
    try:
        point = make_point(parse_exponent(p), parse_exponent(alpha), parse_exponent(beta))
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return constraint_report(point)


@app.get("/vertices")
async def vertices():
    return {name: point.to_dict() for name, point in named_vertices().items()}


@app.post("/profiles/example")
async def example_profile(request: ProfileRequest):
    f = _build(request)
    lo, hi = f.nonzero_range()
    omega = f.omega
    return {
        "label": f.label,
        "M": f.M,
        "l2_norm": f.l2_norm(),
        "l1_norm": f.l1_norm(),
        "support": [float(omega[lo]), float(omega[hi])] if hi >= lo else None,
    }


@app.post("/decompose")
async def decompose_profile(request: ProfileRequest):
    """S, M, K(f) and the measured constants of the decomposition at scale R"""
    f = _build(request)
    try:
        decomp = WavePacketDecomposer(lab_config.packet_settings()).decompose(f, request.R)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.exception("Decomposition failed")
        raise HTTPException(status_code=500, detail=str(e))
    summary = {k: v.item() if hasattr(v, "item") else v for k, v in decomp.summary().items()}
    return {"family": request.family, **summary}


@app.post("/extension/point")
async def extension_point(request: PointRequest):
    f = _build(request)
    try:
        value = evaluate_extension(f, request.x, request.t)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"x": request.x, "t": request.t, "value": complex_to_serializable(value)}


if __name__ == "__main__":
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    logger.info("Starting Wave Packet Lab API")
    uvicorn.run(app, host="0.0.0.0", port=8000, log_level="info")
