class Notification:
    pass
