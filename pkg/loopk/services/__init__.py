"""
loopk Services

One service class per concern, each with a create_*_service() factory.

Services:
- AffineWeylService: alcove folding, faces, finite Weyl groups W_I, the parabolic poset
- RepRingService: torus characters, Weyl action, holomorphic induction phi_I
- VerlindeService: graded colimit cokernels, fusion rings, directed colimits
- FGLService: formal group laws, loop Euler classes, eps_T and sigma
- GenusService: Chern-number genera, TFT invariants, Tate base change
"""

def __getattr__(name):
    """Lazy import to avoid runpy warning when running services as modules"""
    if name == 'AffineWeylService':
        from loopk.services.weyl_service import AffineWeylService
        return AffineWeylService
    elif name == 'create_weyl_service':
        from loopk.services.weyl_service import create_weyl_service
        return create_weyl_service
    elif name == 'RepRingService':
        from loopk.services.rep_ring_service import RepRingService
        return RepRingService
    elif name == 'create_rep_ring_service':
        from loopk.services.rep_ring_service import create_rep_ring_service
        return create_rep_ring_service
    elif name == 'VerlindeService':
        from loopk.services.verlinde_service import VerlindeService
        return VerlindeService
    elif name == 'create_verlinde_service':
        from loopk.services.verlinde_service import create_verlinde_service
        return create_verlinde_service
    elif name == 'FGLService':
        from loopk.services.fgl_service import FGLService
        return FGLService
    elif name == 'create_fgl_service':
        from loopk.services.fgl_service import create_fgl_service
        return create_fgl_service
    elif name == 'GenusService':
        from loopk.services.genus_service import GenusService
        return GenusService
    elif name == 'create_genus_service':
        from loopk.services.genus_service import create_genus_service
        return create_genus_service
    raise AttributeError(f"module '{__name__}' has no attribute '{name}'")

__all__ = [
    'AffineWeylService',
    'RepRingService',
    'VerlindeService',
    'FGLService',
    'GenusService',
    'create_weyl_service',
    'create_rep_ring_service',
    'create_verlinde_service',
    'create_fgl_service',
    'create_genus_service',
]
