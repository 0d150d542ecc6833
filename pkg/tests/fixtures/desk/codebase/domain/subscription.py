class Subscription:
    pass
