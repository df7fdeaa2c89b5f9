"""MAPF search engine: grid instances, PIBT, LaCAM, guidance and LNS refinement."""
