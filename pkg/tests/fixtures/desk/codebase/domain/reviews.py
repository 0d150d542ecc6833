class Reviews:
    pass
