"""
Hypertoric Toolbox
"""

from hypertoric_toolbox.core import (
    HypertoricEnv,
    ToolboxError,
    InputError,
    GuardExceeded,
    SoundnessError,
)
from hypertoric_toolbox.lattice import Character, TorusAction, build_action, signature_action
from hypertoric_toolbox.polytope import Vertex, build_P, enumerate_vertices, vertices_of
from hypertoric_toolbox.morita import Certificate, Refusal, certify, verify_certificate
from hypertoric_toolbox.reports import Report, save_report, save_df
