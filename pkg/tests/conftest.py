from hypothesis import settings

# compiled kernels and exact rational geometry make first calls slow
settings.register_profile("repo", deadline=None, max_examples=100)
settings.load_profile("repo")
