// placeholder while modules are built incrementally
